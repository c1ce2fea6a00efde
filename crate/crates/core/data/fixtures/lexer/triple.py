# leading hash comment
s = "a # not a comment"
t = '''triple
# still string
'''
u = """also "quoted" # string"""
x = 1  # trailing comment
#! bang comment
